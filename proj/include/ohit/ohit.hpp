#pragma once

#include "ohit/baselines.hpp"
#include "ohit/dataset.hpp"
#include "ohit/drsnn.hpp"
#include "ohit/errors.hpp"
#include "ohit/evaluation.hpp"
#include "ohit/pipeline.hpp"
#include "ohit/rng.hpp"
#include "ohit/shrinkage.hpp"
#include "ohit/synthesis.hpp"
#include "ohit/types.hpp"

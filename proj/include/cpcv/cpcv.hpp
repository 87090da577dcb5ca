#pragma once

#include "cpcv/criteria.hpp"
#include "cpcv/error.hpp"
#include "cpcv/folds.hpp"
#include "cpcv/io.hpp"
#include "cpcv/pipeline.hpp"
#include "cpcv/segmentation.hpp"
#include "cpcv/signal.hpp"
#include "cpcv/simulate.hpp"

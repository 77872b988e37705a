#pragma once

#include "qrobust/analysis.hpp"
#include "qrobust/bloch.hpp"
#include "qrobust/config.hpp"
#include "qrobust/errors.hpp"
#include "qrobust/io.hpp"
#include "qrobust/linalg.hpp"
#include "qrobust/model.hpp"
#include "qrobust/stats.hpp"
#include "qrobust/sweep.hpp"

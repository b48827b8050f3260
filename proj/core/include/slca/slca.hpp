#pragma once

#include "slca/alignment.hpp"
#include "slca/analysis.hpp"
#include "slca/dataio.hpp"
#include "slca/errors.hpp"
#include "slca/linalg.hpp"
#include "slca/losses.hpp"
#include "slca/model.hpp"
#include "slca/optimizer.hpp"
#include "slca/parallel.hpp"
#include "slca/protocol.hpp"
#include "slca/report.hpp"
#include "slca/rng.hpp"
#include "slca/stats.hpp"
#include "slca/types.hpp"

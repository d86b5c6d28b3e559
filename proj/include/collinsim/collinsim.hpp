#pragma once

#include "collinsim/config.hpp"
#include "collinsim/corrstruct.hpp"
#include "collinsim/datagen.hpp"
#include "collinsim/errors.hpp"
#include "collinsim/grid.hpp"
#include "collinsim/lsq.hpp"
#include "collinsim/metrics.hpp"
#include "collinsim/ols.hpp"
#include "collinsim/oracles.hpp"
#include "collinsim/philox.hpp"
#include "collinsim/replicate_basis.hpp"
#include "collinsim/report.hpp"
#include "collinsim/runner.hpp"

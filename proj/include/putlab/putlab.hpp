#pragma once

// Umbrella header.

#include "putlab/config.hpp"
#include "putlab/errors.hpp"
#include "putlab/market.hpp"
#include "putlab/paper_data.hpp"
#include "putlab/payoff.hpp"
#include "putlab/pricing.hpp"
#include "putlab/report.hpp"
#include "putlab/rng.hpp"
#include "putlab/strategy.hpp"
#include "putlab/utility.hpp"

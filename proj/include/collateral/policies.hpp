#pragma once

#include "collateral/policies/decision.hpp"
#include "collateral/policies/flush_all.hpp"
#include "collateral/policies/flush_two_when_full.hpp"
#include "collateral/policies/flush_when_full.hpp"
#include "collateral/policies/randomized.hpp"
#include "collateral/policies/threshold.hpp"

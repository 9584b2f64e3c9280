#pragma once

#include "xpeak/codes.hpp"
#include "xpeak/exact.hpp"
#include "xpeak/family.hpp"
#include "xpeak/geometry.hpp"
#include "xpeak/halfspace.hpp"
#include "xpeak/learner.hpp"
#include "xpeak/oracles.hpp"
#include "xpeak/stats.hpp"

#pragma once

#include "zpower/cauchy.hpp"
#include "zpower/dominance.hpp"
#include "zpower/error.hpp"
#include "zpower/mc.hpp"
#include "zpower/quadrature.hpp"
#include "zpower/random.hpp"
#include "zpower/specfun.hpp"
#include "zpower/ztest.hpp"

#pragma once

#include "cbi/errors.hpp"
#include "cbi/levy_measure.hpp"
#include "cbi/limit_law.hpp"
#include "cbi/mechanisms.hpp"
#include "cbi/riccati.hpp"
#include "cbi/scale.hpp"
#include "cbi/simulate.hpp"

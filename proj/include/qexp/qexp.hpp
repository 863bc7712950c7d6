#pragma once

#include "base.hpp"
#include "cylinders.hpp"
#include "density.hpp"
#include "ergodic.hpp"
#include "error.hpp"
#include "maps.hpp"
#include "solve.hpp"
#include "stepfn.hpp"
#include "transfer.hpp"

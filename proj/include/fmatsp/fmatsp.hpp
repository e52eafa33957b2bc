#pragma once

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"
#include "fmatsp/fm.hpp"
#include "fmatsp/fma.hpp"
#include "fmatsp/format.hpp"
#include "fmatsp/landscape.hpp"
#include "fmatsp/perm_codec.hpp"
#include "fmatsp/qubo.hpp"
#include "fmatsp/tsp.hpp"

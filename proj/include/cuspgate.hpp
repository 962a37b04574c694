#pragma once

#include "cuspgate/core_arith.hpp"
#include "cuspgate/lattice.hpp"
#include "cuspgate/cusp_lattice.hpp"
#include "cuspgate/eta_quotient.hpp"
#include "cuspgate/atkin_lehner.hpp"
#include "cuspgate/ec_model.hpp"
#include "cuspgate/gates_search.hpp"

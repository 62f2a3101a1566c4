#pragma once

#include "trirg/error.hpp"
#include "trirg/lattice.hpp"
#include "trirg/ed/basis.hpp"
#include "trirg/ed/sparse.hpp"
#include "trirg/ed/hamiltonian.hpp"
#include "trirg/ed/eigensolver.hpp"
#include "trirg/ed/symmetry.hpp"
#include "trirg/ed/charge_gap.hpp"
#include "trirg/entanglement/distribution.hpp"
#include "trirg/rg.hpp"
#include "trirg/entanglement/observables.hpp"
#include "trirg/scaling.hpp"
#include "trirg/experiment.hpp"
#include "trirg/io.hpp"

#pragma once

#include "qcavqe/ansatz.hpp"
#include "qcavqe/electrostatics.hpp"
#include "qcavqe/exact.hpp"
#include "qcavqe/experiments.hpp"
#include "qcavqe/foundation.hpp"
#include "qcavqe/optimize.hpp"
#include "qcavqe/pauli.hpp"
#include "qcavqe/sparse_state.hpp"
#include "qcavqe/statevector.hpp"
#include "qcavqe/vqe.hpp"

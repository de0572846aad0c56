#pragma once

// Umbrella header for the dissipative persistent-current simulator.

#include "nhpc/biorthogonal.hpp"
#include "nhpc/config.hpp"
#include "nhpc/errors.hpp"
#include "nhpc/exact_diagonalization.hpp"
#include "nhpc/models.hpp"
#include "nhpc/observables.hpp"
#include "nhpc/self_energy.hpp"
#include "nhpc/special_functions.hpp"
#include "nhpc/susceptibility.hpp"
#include "nhpc/sweep.hpp"
#include "nhpc/version.hpp"

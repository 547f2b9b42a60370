#pragma once

#include "crackdyn/config.hpp"
#include "crackdyn/crack_physics.hpp"
#include "crackdyn/csv.hpp"
#include "crackdyn/dynamics.hpp"
#include "crackdyn/errors.hpp"
#include "crackdyn/fem_oracle.hpp"
#include "crackdyn/log.hpp"
#include "crackdyn/modal_algebra.hpp"
#include "crackdyn/modal_solver.hpp"
#include "crackdyn/quadrature.hpp"

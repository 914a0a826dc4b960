#pragma once

#include "errors.hpp"
#include "dense.hpp"
#include "expr.hpp"
#include "metric.hpp"
#include "lattice_operator.hpp"
#include "spectral.hpp"
#include "symmetry.hpp"
#include "observables.hpp"
#include "evolve.hpp"
#include "cubehelix.hpp"
#include "io.hpp"
#include "config.hpp"
#include "commands.hpp"

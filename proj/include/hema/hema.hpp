#pragma once

#include "hema/block_tridiagonal.hpp"
#include "hema/control.hpp"
#include "hema/errors.hpp"
#include "hema/flight_dynamics.hpp"
#include "hema/interior_point.hpp"
#include "hema/interpolation.hpp"
#include "hema/io.hpp"
#include "hema/ocp.hpp"
#include "hema/powertrain.hpp"
#include "hema/random_instances.hpp"
#include "hema/report.hpp"
#include "hema/scenario.hpp"
#include "hema/scheduling.hpp"
#include "hema/synthetic.hpp"
#include "hema/units.hpp"

#pragma once

#include "analysis.hpp"
#include "assembly.hpp"
#include "checks.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "discretization.hpp"
#include "element.hpp"
#include "errors.hpp"
#include "jet.hpp"
#include "mesh.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "source.hpp"
#include "study.hpp"
#include "vtk.hpp"

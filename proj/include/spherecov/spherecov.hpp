#pragma once

// Isotropic positive definite kernels on spheres, sphere x line and products
// of spheres: synthesis, coefficient recovery, certification and simulation.

#include "spherecov/error.hpp"
#include "spherecov/gegenbauer.hpp"
#include "spherecov/geometry.hpp"
#include "spherecov/gram.hpp"
#include "spherecov/random.hpp"
#include "spherecov/schoenberg.hpp"
#include "spherecov/spacetime.hpp"
#include "spherecov/product_spheres.hpp"
#include "spherecov/spherical_harmonics.hpp"
#include "spherecov/fields.hpp"

#pragma once

#include "sdl/error.hpp"
#include "sdl/jet.hpp"
#include "sdl/ode.hpp"
#include "sdl/parallel.hpp"
#include "sdl/quadrature.hpp"
#include "sdl/wirtinger.hpp"

#pragma once

#include "modelsr/core.hpp"
#include "modelsr/experiments.hpp"
#include "modelsr/fft.hpp"
#include "modelsr/io.hpp"
#include "modelsr/matching.hpp"
#include "modelsr/models.hpp"
#include "modelsr/render.hpp"
#include "modelsr/solver.hpp"
#include "modelsr/stability.hpp"
#include "modelsr/svg.hpp"

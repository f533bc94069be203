#pragma once

#include "sepnmf/algorithms.hpp"
#include "sepnmf/bench.hpp"
#include "sepnmf/datagen.hpp"
#include "sepnmf/diagnostics.hpp"
#include "sepnmf/io.hpp"
#include "sepnmf/matrix.hpp"
#include "sepnmf/objective.hpp"
#include "sepnmf/projection.hpp"
#include "sepnmf/rng.hpp"
#include "sepnmf/simplex_qp.hpp"

#pragma once

#include "gsamp/error.hpp"
#include "gsamp/graph.hpp"
#include "gsamp/spectral_basis.hpp"
#include "gsamp/knn_graph.hpp"
#include "gsamp/datasets.hpp"
#include "gsamp/eigensolver.hpp"
#include "gsamp/sampling.hpp"
#include "gsamp/filter.hpp"
#include "gsamp/reconstruct.hpp"
#include "gsamp/active_ssl.hpp"
#include "gsamp/io.hpp"
#include "gsamp/bench.hpp"

#pragma once

#include "knnidx/types.hpp"
#include "knnidx/road_network.hpp"
#include "knnidx/dimacs.hpp"
#include "knnidx/generators.hpp"
#include "knnidx/object_set.hpp"
#include "knnidx/bn_graph.hpp"
#include "knnidx/knn_table.hpp"
#include "knnidx/knn_builder.hpp"
#include "knnidx/query.hpp"
#include "knnidx/maintenance.hpp"
#include "knnidx/oracle.hpp"
#include "knnidx/bundle.hpp"

#pragma once

#include "clustertree/axioms.hpp"
#include "clustertree/density.hpp"
#include "clustertree/discretizer.hpp"
#include "clustertree/errors.hpp"
#include "clustertree/level.hpp"
#include "clustertree/level_tree.hpp"
#include "clustertree/merge_metric.hpp"
#include "clustertree/regions.hpp"
#include "clustertree/serialize.hpp"
#include "clustertree/shifted_grid.hpp"
#include "clustertree/union_find.hpp"

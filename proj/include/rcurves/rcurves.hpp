#pragma once

#include "rcurves/collection.hpp"
#include "rcurves/collection_metric.hpp"
#include "rcurves/coupling.hpp"
#include "rcurves/crossings.hpp"
#include "rcurves/curve_metric.hpp"
#include "rcurves/diagnostics.hpp"
#include "rcurves/ensembles.hpp"
#include "rcurves/error.hpp"
#include "rcurves/geometry.hpp"
#include "rcurves/io.hpp"
#include "rcurves/matching.hpp"
#include "rcurves/nets.hpp"
#include "rcurves/parallel.hpp"
#include "rcurves/random.hpp"
#include "rcurves/skeleton.hpp"

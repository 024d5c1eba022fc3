#pragma once

#include "prodgraph/baselines.hpp"
#include "prodgraph/catalog.hpp"
#include "prodgraph/dictionary.hpp"
#include "prodgraph/evaluation.hpp"
#include "prodgraph/graph.hpp"
#include "prodgraph/ingest.hpp"
#include "prodgraph/label_propagation.hpp"
#include "prodgraph/pipeline.hpp"
#include "prodgraph/surprise.hpp"
#include "prodgraph/swing.hpp"
#include "prodgraph/tsv_io.hpp"
#include "prodgraph/types.hpp"

#pragma once

#include "classify.hpp"
#include "common.hpp"
#include "database.hpp"
#include "engine.hpp"
#include "exact.hpp"
#include "flow.hpp"
#include "gadgets.hpp"
#include "hypergraph.hpp"
#include "linearize.hpp"
#include "query.hpp"
#include "resp.hpp"
#include "structure.hpp"

#pragma once

// Everything except the JSON I/O layer (circdyn/io.hpp), which needs nlohmann_json.

#include "circdyn/rational.hpp"
#include "circdyn/errors.hpp"
#include "circdyn/circle.hpp"
#include "circdyn/pl_map.hpp"
#include "circdyn/measure.hpp"
#include "circdyn/partition.hpp"
#include "circdyn/shredder.hpp"
#include "circdyn/wicked.hpp"
#include "circdyn/classifier.hpp"

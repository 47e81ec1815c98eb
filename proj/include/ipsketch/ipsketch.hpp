#pragma once

#include "error.hpp"
#include "hashing.hpp"
#include "sparse_vector.hpp"
#include "common.hpp"
#include "minhash.hpp"
#include "wmh.hpp"
#include "baselines.hpp"
#include "sketch.hpp"
#include "serialize.hpp"
#include "tables.hpp"
#include "bench.hpp"

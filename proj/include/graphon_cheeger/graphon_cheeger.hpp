#pragma once

#include "graphon_cheeger/core.hpp"
#include "graphon_cheeger/error.hpp"
#include "graphon_cheeger/io.hpp"
#include "graphon_cheeger/numeric.hpp"
#include "graphon_cheeger/partition.hpp"
#include "graphon_cheeger/pipeline.hpp"
#include "graphon_cheeger/report.hpp"
#include "graphon_cheeger/spectral.hpp"

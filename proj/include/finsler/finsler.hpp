#pragma once

#include "finsler/error.hpp"
#include "finsler/tensor.hpp"
#include "finsler/jet.hpp"
#include "finsler/diff.hpp"
#include "finsler/sample.hpp"
#include "finsler/metric.hpp"
#include "finsler/linalg.hpp"
#include "finsler/frame.hpp"
#include "finsler/dsl.hpp"
#include "finsler/berwald.hpp"
#include "finsler/curvature.hpp"
#include "finsler/scalar_class.hpp"
#include "finsler/point_data.hpp"
#include "finsler/fd_pipeline.hpp"
#include "finsler/identities.hpp"
#include "finsler/parallel.hpp"
#include "finsler/catalog.hpp"
#include "finsler/classify.hpp"

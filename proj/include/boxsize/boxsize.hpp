#pragma once

#include "boxsize/model.hpp"
#include "boxsize/split.hpp"
#include "boxsize/refine.hpp"
#include "boxsize/merge.hpp"
#include "boxsize/eval.hpp"
#include "boxsize/pipeline.hpp"
#include "boxsize/baseline.hpp"
#include "boxsize/synthetic.hpp"

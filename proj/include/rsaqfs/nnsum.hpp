#pragma once

#include "rsaqfs/nnsum/checkpoint.hpp"
#include "rsaqfs/nnsum/grad_check.hpp"
#include "rsaqfs/nnsum/model.hpp"
#include "rsaqfs/nnsum/seq2seq.hpp"
#include "rsaqfs/nnsum/train.hpp"

#pragma once

#include "qcrawl/analytics.hpp"
#include "qcrawl/corpus_graph.hpp"
#include "qcrawl/crawler.hpp"
#include "qcrawl/error.hpp"
#include "qcrawl/evaluation.hpp"
#include "qcrawl/quality.hpp"
#include "qcrawl/records.hpp"
#include "qcrawl/retrieval.hpp"
#include "qcrawl/significance.hpp"
#include "qcrawl/synthetic.hpp"
#include "qcrawl/tokenize.hpp"

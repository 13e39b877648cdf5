#pragma once

#include <string>
#include <vector>

#include "socs/adwords.hpp"
#include "socs/harness.hpp"
#include "socs/instance.hpp"
#include "socs/matching.hpp"

namespace socs {

inline constexpr const char* kFormatVersion = "socs-lab/1";

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// {version, class, T, agents:[{id, weight?, budget?}], types:[{id, edges|bids|weights}],
//  arrivals:[[{type, prob}]]}
std::string to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

// {version, x:[{t, type, agent, value}]} with zero entries omitted
std::string to_json(const Instance& inst, const FractionalAllocation& x);
FractionalAllocation allocation_from_json(const Instance& inst, const std::string& text);

// [{t, type, agent, weight?}]; weight is the gain of the edge when the class has one
std::string to_json(const Instance& inst, const Matching& m);
Matching matching_from_json(const Instance& inst, const std::string& text);

// {I, J, p:[[...]], weights?}
std::string to_json(const QueryCommitInstance& qc);
QueryCommitInstance query_commit_from_json(const std::string& text);

// {agents:[{id, budget}], bids:[[...]], mu?:[[...]]}
std::string to_json(const AdversarialSequence& seq);
AdversarialSequence adversarial_from_json(const std::string& text);

std::string to_json(const StatSummary& s);

}  // namespace socs

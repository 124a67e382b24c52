#include "qflow/solver.hpp"

namespace qflow {

namespace {

std::string join_issues(const std::vector<SpecIssue>& issues) {
    std::string s = "invalid equation:";
    for (const auto& i : issues) s += " [" + i.hypothesis + "] " + i.message + ";";
    return s;
}

}  // namespace

SpecError::SpecError(std::vector<SpecIssue> issues) : Error(join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace qflow

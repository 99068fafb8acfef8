// acceptance.hpp — Built-in validation suite, one result per criterion

#pragma once

#include <string>
#include <vector>

#include "lambda_dyn/reservoir.hpp"
#include "lambda_dyn/system.hpp"

namespace lambda_dyn {

enum class Status { Pass, Fail, Skip };

const char* status_name(Status s);

struct CriterionResult {
    int id = 0;
    std::string name;
    Status status = Status::Skip;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceSetup {
    SystemParams params;  // σ is the σ > 0 value; σ = 0 criteria override it
    FormFactor reservoir;
    unsigned threads = 0;
};

// The standard point: β = 1, Δ = 1, λ = 0.05, σ = 1e-5, A = 0.3, p = -1/2, m = 1, κ0 = 1.
AcceptanceSetup standard_setup();

// Criteria 1-10. Outside σ < λ² < Δ the regime-dependent criteria are skipped.
std::vector<CriterionResult> run_acceptance(const AcceptanceSetup& setup);

bool all_passed(const std::vector<CriterionResult>& results);

// "PASS  1 name: detail (0.12 s)"
std::string format_result(const CriterionResult& r);

} // namespace lambda_dyn

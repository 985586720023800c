// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pubfab {

// Base for all domain-rule failures. `code()` is a stable machine-readable
// tag; what() carries the human diagnostic. The CLI maps these to exit 1.
class DomainError : public std::runtime_error {
public:
    DomainError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define PUBFAB_DEFINE_ERROR(Name)                              \
    class Name : public DomainError {                          \
    public:                                                    \
        explicit Name(const std::string& message)              \
            : DomainError(#Name, message) {}                   \
    }

// canonical
PUBFAB_DEFINE_ERROR(UnencodableValue);
PUBFAB_DEFINE_ERROR(MalformedEncoding);
PUBFAB_DEFINE_ERROR(UnknownAlgorithm);
PUBFAB_DEFINE_ERROR(MalformedFingerprint);

// model
PUBFAB_DEFINE_ERROR(InvalidReview);

// coe
PUBFAB_DEFINE_ERROR(EmptyRound);
PUBFAB_DEFINE_ERROR(MalformedCoE);

// review rounds
PUBFAB_DEFINE_ERROR(SpecInvalid);
PUBFAB_DEFINE_ERROR(MissingAnonymizedVariant);
PUBFAB_DEFINE_ERROR(MissingCoE);
PUBFAB_DEFINE_ERROR(WrongPhase);
PUBFAB_DEFINE_ERROR(TargetMismatch);
PUBFAB_DEFINE_ERROR(ProcessMismatch);
PUBFAB_DEFINE_ERROR(TooEarly);

// escrow
PUBFAB_DEFINE_ERROR(PetitionTooSmall);
PUBFAB_DEFINE_ERROR(PetitionerOnBoard);
PUBFAB_DEFINE_ERROR(UnknownInvestigation);
PUBFAB_DEFINE_ERROR(NotYetExpired);
PUBFAB_DEFINE_ERROR(EscrowSealed);

// store
PUBFAB_DEFINE_ERROR(SubmissionRefused);
PUBFAB_DEFINE_ERROR(NotOwner);

// query
PUBFAB_DEFINE_ERROR(QueryPrivate);

// harness
PUBFAB_DEFINE_ERROR(UnknownScenario);
PUBFAB_DEFINE_ERROR(UnknownTarget);

#undef PUBFAB_DEFINE_ERROR

}  // namespace pubfab

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gravcam {

/// Caller passed a value outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A file or record could not be decoded. Carries the offending frame index
/// when the failure is attributable to a single frame.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what, std::optional<long> frame = std::nullopt);

    std::optional<long> frame() const noexcept { return frame_; }

    /// Same error with `prefix` prepended to the message (e.g. a file path).
    FormatError prefixed(const std::string& prefix) const;

private:
    struct Raw {};
    FormatError(Raw, const std::string& message, std::optional<long> frame);

    std::optional<long> frame_;
};

/// Broken internal invariant (should be unreachable for valid inputs).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Wraps a delegate failure with clip/frame context for pipeline callers.
class ContextError : public std::runtime_error {
public:
    ContextError(const std::string& clip, std::optional<long> frame, const std::string& what,
                 bool data_error);

    const std::string& clip() const noexcept { return clip_; }
    std::optional<long> frame() const noexcept { return frame_; }
    bool is_data_error() const noexcept { return data_error_; }

private:
    std::string clip_;
    std::optional<long> frame_;
    bool data_error_;
};

}  // namespace gravcam

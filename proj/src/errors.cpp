#include "gravcam/errors.hpp"

namespace gravcam {

namespace {

std::string with_frame(const std::string& what, std::optional<long> frame) {
    if (!frame) return what;
    return "frame " + std::to_string(*frame) + ": " + what;
}

}  // namespace

FormatError::FormatError(const std::string& what, std::optional<long> frame)
    : std::runtime_error(with_frame(what, frame)), frame_(frame) {}

FormatError::FormatError(Raw, const std::string& message, std::optional<long> frame)
    : std::runtime_error(message), frame_(frame) {}

FormatError FormatError::prefixed(const std::string& prefix) const {
    return FormatError(Raw{}, prefix + what(), frame_);
}

ContextError::ContextError(const std::string& clip, std::optional<long> frame,
                           const std::string& what, bool data_error)
    : std::runtime_error("clip " + clip + ", " + with_frame(what, frame)),
      clip_(clip),
      frame_(frame),
      data_error_(data_error) {}

}  // namespace gravcam

#include "checkseg/error.hpp"

namespace checkseg {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "IoError";
        case ErrorCode::Format: return "FormatError";
        case ErrorCode::NoInk: return "NoInk";
        case ErrorCode::BandNotFound: return "BandNotFound";
        case ErrorCode::BandTooTall: return "BandTooTall";
        case ErrorCode::EmptyBand: return "EmptyBand";
        case ErrorCode::DidNotConverge: return "DidNotConverge";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::DegenerateShape: return "DegenerateShape";
        case ErrorCode::MismatchedOrder: return "MismatchedOrder";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::EmptyGlyph: return "EmptyGlyph";
        case ErrorCode::BandTooShort: return "BandTooShort";
        case ErrorCode::UnknownBank: return "UnknownBank";
        case ErrorCode::NoDifference: return "NoDifference";
    }
    return "Unknown";
}

}  // namespace checkseg

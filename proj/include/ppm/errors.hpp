#pragma once

#include <stdexcept>
#include <string>

namespace ppm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define PPM_ERROR(Name)                     \
    struct Name : Error {                   \
        using Error::Error;                 \
        Name() : Error(#Name) {}            \
    }

PPM_ERROR(InvalidPermutation);
PPM_ERROR(DuplicateCoordinate);
PPM_ERROR(IndexOutOfRange);
PPM_ERROR(DimensionMismatch);
PPM_ERROR(NotClosedEntry);
PPM_ERROR(NoCycle);
PPM_ERROR(MultipleDEntries);
PPM_ERROR(BoxOverflow);
PPM_ERROR(InvalidGridding);
PPM_ERROR(MalformedPartition);
PPM_ERROR(NoTextGridding);
PPM_ERROR(ParseError);
PPM_ERROR(EmptyClause);
PPM_ERROR(ClauseTooWide);
PPM_ERROR(AdjacencyMismatch);
PPM_ERROR(SpanNotMonotone);
PPM_ERROR(EndNotD);
PPM_ERROR(ScheduleExhausted);
PPM_ERROR(UnsupportedCase);
PPM_ERROR(TooManyVariables);

#undef PPM_ERROR

// Carries the number of usable D-entries and path tiles a schedule needs.
struct PathTooShort : Error {
    long required_d;
    long available_d;
    PathTooShort(long req, long avail)
        : Error("PathTooShort: schedule needs " + std::to_string(req) +
                " usable D-entries, path offers " + std::to_string(avail)),
          required_d(req), available_d(avail) {}
};

}  // namespace ppm

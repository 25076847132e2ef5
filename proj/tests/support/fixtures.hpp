#pragma once

#include <string>
#include <vector>

#include "distphylo/distance_matrix.hpp"

namespace fixture {

inline const std::vector<std::string> kNames = {"A", "B", "C", "D", "E"};

inline const std::vector<std::vector<double>> kMatrix2 = {
    {0, 2, 7, 7, 6}, {2, 0, 7, 7, 6}, {7, 7, 0, 5, 5}, {7, 7, 5, 0, 3}, {6, 6, 5, 3, 0}};

inline distphylo::DistanceMatrix matrix2() { return distphylo::DistanceMatrix::from_rows(kNames, kMatrix2); }

inline const char* kMatrix2Phylip =
    "5\n"
    "A 0 2 7 7 6\n"
    "B 2 0 7 7 6\n"
    "C 7 7 0 5 5\n"
    "D 7 7 5 0 3\n"
    "E 6 6 5 3 0\n";

// Seven-locus profiles whose raw Hamming distances are exactly matrix (2).
inline const char* kMatrix2Profiles =
    "A\t1\t1\t1\t1\t1\t1\t1\n"
    "B\t1\t3\t1\t1\t1\t4\t1\n"
    "C\t2\t4\t3\t3\t2\t2\t3\n"
    "D\t3\t2\t2\t3\t3\t3\t3\n"
    "E\t2\t2\t2\t4\t1\t3\t3\n";

inline const char* kFhpSequences = "S1\tabcde\nS2\tbbdce\nS3\tacdcd\n";

}  // namespace fixture

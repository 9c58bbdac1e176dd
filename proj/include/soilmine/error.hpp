#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace soilmine {

enum class ErrorCode {
  // data ingestion
  Io,
  MissingColumn,
  DuplicateColumn,
  BadValue,
  MissingLabel,
  MissingValue,
  EmptyColumn,
  InvalidConfig,
  EmptyDataset,
  UnlabeledDataset,
  // rule files
  SyntaxError,
  UnknownAttribute,
  DuplicateAttribute,
  BandsNotAscending,
  BadCuts,
  // learning
  AllZero,
  DegenerateSplit,
  TooFewRows,
  NonFiniteTarget,
  BadModel,
  // evaluation
  BadK,
  EmptyMatrix,
  LengthMismatch,
  ZeroVariance,
  DegenerateBaseline,
  MixedKinds,
  Empty,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnlabeledDataset: return "UnlabeledDataset";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
    case ErrorCode::BandsNotAscending: return "BandsNotAscending";
    case ErrorCode::BadCuts: return "BadCuts";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::NonFiniteTarget: return "NonFiniteTarget";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::MixedKinds: return "MixedKinds";
    case ErrorCode::Empty: return "Empty";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error.
///
/// Errors carry an optional location: a 1-based data row (CSV line minus the
/// header), a line number for rule files, a column or attribute name, and the
/// cross-validation fold in which a training failure happened.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, std::optional<std::size_t> row = {},
        std::string column = {})
      : std::runtime_error(compose(code, detail, row, column, std::nullopt)),
        code_(code),
        detail_(std::move(detail)),
        row_(row),
        column_(std::move(column)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }
  std::optional<std::size_t> fold() const noexcept { return fold_; }

  /// Copy of this error annotated with the fold it was raised in.
  Error in_fold(std::size_t fold) const {
    Error e = *this;
    e.fold_ = fold;
    e.message_ = compose(code_, detail_, row_, column_, fold);
    return e;
  }

  const char* what() const noexcept override {
    return message_.empty() ? std::runtime_error::what() : message_.c_str();
  }

 private:
  static std::string compose(ErrorCode code, const std::string& detail,
                             std::optional<std::size_t> row, const std::string& column,
                             std::optional<std::size_t> fold) {
    std::string msg(to_string(code));
    if (row || !column.empty()) {
      msg += "(";
      if (row) msg += std::to_string(*row);
      if (row && !column.empty()) msg += ", ";
      msg += column;
      msg += ")";
    }
    if (fold) msg += " in fold " + std::to_string(*fold);
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> row_;
  std::string column_;
  std::optional<std::size_t> fold_;
  std::string message_;
};

}  // namespace soilmine

"""Pointing-based constituency parser."""

from ._ptrparse import (
    BinaryTree,
    ConfigError,
    DataError,
    Hyperparams,
    Model,
    ModelConfig,
    ParseError,
    TrainingError,
    TrainResult,
    Tree,
    TreeError,
    evaluate,
    parse_bracketed,
    read_treebank,
    train,
    validate_pointing,
    verify,
)


def parse_tagged(model, line, delimiter="_"):
    """Parse one whitespace-separated line of word_POS tokens."""
    words = []
    for token in line.split():
        word, sep, pos = token.rpartition(delimiter)
        if not sep or not word or not pos:
            raise DataError(f"malformed token {token!r} (expected word{delimiter}POS)")
        words.append((word, pos))
    return model.parse(words)


__all__ = [
    "BinaryTree", "ConfigError", "DataError", "Hyperparams", "Model", "ModelConfig",
    "ParseError", "TrainingError", "TrainResult", "Tree", "TreeError", "evaluate",
    "parse_bracketed", "parse_tagged", "read_treebank", "train", "validate_pointing", "verify",
]

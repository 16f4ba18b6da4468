"""アプリケーション共通の例外クラス"""


class FractalSlicerError(Exception):
    """全ての例外の基底クラス"""


class ValidationError(FractalSlicerError, ValueError):
    """入力値の検証エラー（CLI の終了コード 1）"""


class EmptyOrSingleton(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class LetterOutOfRange(ValidationError):
    pass


class ConditionBPrimeFails(ValidationError):
    pass


class NotSeparated(ValidationError):
    pass


class ScenarioError(ValidationError):
    pass


class IFSFormatError(ValidationError):
    pass


class BudgetExceeded(FractalSlicerError):
    """列挙数・深さの上限超過（CLI の終了コード 2）"""


class AspectUnreachable(BudgetExceeded):
    pass

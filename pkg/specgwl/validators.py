import functools
import os
from typing import Any, Optional


class ValidationError(Exception):
    """
    Is being raised when config value passed can't be converted properly
    Must be raised with string, describing why value is incorrect
    It will be shown on stderr and the command exits with code 1
    """


class Validator:
    """
    Class used as validator of config value
    :param validator: Sync function, which raises `ValidationError` if passed
                      value is incorrect (with explanation) and returns converted
                      value if it is semantically correct.
    :param doc: Human-readable description, used in `--help`
    :param _internal_id: Name of the validator family
    """

    def __init__(
        self,
        validator: callable,
        doc: str = None,
        _internal_id: str = None,
    ):
        self.validate = validator
        self.doc = doc
        self.internal_id = _internal_id


def _Boolean(value: Any, /) -> bool:
    true_cases = ["True", "true", "1", 1, True, "yes"]
    false_cases = ["False", "false", "0", 0, False, "no"]
    if value not in true_cases + false_cases:
        raise ValidationError("Passed value must be a boolean")

    return value in true_cases


def Boolean() -> Validator:
    """
    Any logical value to be passed
    `1`, `"1"` etc. will be automatically converted to bool
    """
    return Validator(_Boolean, "boolean", _internal_id="Boolean")


def _Integer(
    value: Any,
    /,
    *,
    minimum: Optional[int],
    maximum: Optional[int],
) -> int:
    try:
        value = int(str(value).strip())
    except ValueError:
        raise ValidationError(f"Passed value ({value}) must be a number")

    if minimum is not None and value < minimum:
        raise ValidationError(f"Passed value ({value}) is lower than minimum one")

    if maximum is not None and value > maximum:
        raise ValidationError(f"Passed value ({value}) is greater than maximum one")

    return value


def _range_doc(kind: str, minimum: Any, maximum: Any) -> str:
    if minimum is not None and maximum is not None:
        return f"{kind} from {minimum} to {maximum}"

    if minimum is not None:
        return f"{kind} not lower than {minimum}"

    if maximum is not None:
        return f"{kind} not greater than {maximum}"

    return kind


def Integer(
    *,
    minimum: Optional[int] = None,
    maximum: Optional[int] = None,
) -> Validator:
    """
    Checks whether passed argument is an integer value
    :param minimum: Minimal number to be passed
    :param maximum: Maximum number to be passed
    """
    return Validator(
        functools.partial(_Integer, minimum=minimum, maximum=maximum),
        _range_doc("integer", minimum, maximum),
        _internal_id="Integer",
    )


def _Float(
    value: Any,
    /,
    *,
    minimum: Optional[float] = None,
    maximum: Optional[float] = None,
) -> float:
    try:
        value = float(str(value).strip().replace(",", "."))
    except ValueError:
        raise ValidationError(f"Passed value ({value}) must be a float")

    if value != value:
        raise ValidationError("Passed value must not be NaN")

    if minimum is not None and value < minimum:
        raise ValidationError(f"Passed value ({value}) is lower than minimum one")

    if maximum is not None and value > maximum:
        raise ValidationError(f"Passed value ({value}) is greater than maximum one")

    return value


def Float(
    minimum: Optional[float] = None,
    maximum: Optional[float] = None,
) -> Validator:
    """
    Checks whether passed argument is a float value
    :param minimum: Minimal number to be passed
    :param maximum: Maximum number to be passed
    """
    return Validator(
        functools.partial(_Float, minimum=minimum, maximum=maximum),
        _range_doc("float", minimum, maximum),
        _internal_id="Float",
    )


def Probability() -> Validator:
    """Float in the closed unit interval"""
    return Validator(
        functools.partial(_Float, minimum=0.0, maximum=1.0),
        "probability from 0 to 1",
        _internal_id="Probability",
    )


def _Choice(value: Any, /, *, possible_values: list) -> Any:
    if value not in possible_values:
        raise ValidationError(
            f"Passed value ({value}) is not one of the following: {'/'.join(list(map(str, possible_values)))}"
        )

    return value


def Choice(possible_values: list, /) -> Validator:
    """
    Check whether entered value is in the allowed list
    :param possible_values: Allowed values to be passed to config param
    """
    return Validator(
        functools.partial(_Choice, possible_values=possible_values),
        f"one of the following: {'/'.join(list(map(str, possible_values)))}",
        _internal_id="Choice",
    )


def _Series(
    value: Any,
    /,
    *,
    validator: Optional[Validator],
    min_len: Optional[int],
):
    if not isinstance(value, (list, tuple, set)):
        value = str(value).split(",")

    value = [item.strip() if isinstance(item, str) else item for item in value]
    value = [item for item in value if item != ""]

    if min_len is not None and len(value) < min_len:
        raise ValidationError(
            f"Passed value ({value}) contains less than {min_len} items"
        )

    if isinstance(validator, Validator):
        for i, item in enumerate(value):
            try:
                value[i] = validator.validate(item)
            except ValidationError:
                raise ValidationError(
                    f"Passed value ({value}) contains invalid item ({str(item).strip()}), which must be {validator.doc}"
                )

    return value


def Series(
    validator: Optional[Validator] = None,
    min_len: Optional[int] = None,
) -> Validator:
    """
    Represents the series of value (simply `list`)
    :param validator: Internal validator for each sequence value
    :param min_len: Minimal number of series items to be passed
    """
    _each = f" (each must be {validator.doc})" if validator is not None else ""
    _len = f" (at least {min_len} pcs.)" if min_len is not None else ""

    return Validator(
        functools.partial(_Series, validator=validator, min_len=min_len),
        f"series of values{_len}{_each}, separated with «,»",
        _internal_id="Series",
    )


def _String(value: Any, /) -> str:
    return str(value)


def String() -> Validator:
    """Automatically converts value to string"""
    return Validator(_String, "string", _internal_id="String")


def _ExistingPath(value: Any, /, *, directory: bool) -> str:
    value = str(value)
    if directory and not os.path.isdir(value):
        raise ValidationError(f"Passed value ({value}) is not an existing directory")

    if not directory and not os.path.isfile(value):
        raise ValidationError(f"Passed value ({value}) is not an existing file")

    return value


def ExistingPath(directory: bool = False) -> Validator:
    """
    Checks that the path exists at validation time
    :param directory: Require a directory instead of a regular file
    """
    return Validator(
        functools.partial(_ExistingPath, directory=directory),
        "existing directory" if directory else "existing file",
        _internal_id="ExistingPath",
    )

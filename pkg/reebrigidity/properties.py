import functools
import re

from reebrigidity.exceptions import InflateError

_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")


def validator(fn):
    fn_name = fn.func_name if hasattr(fn, "func_name") else fn.__name__
    if fn_name != "inflate":
        raise ValueError("Unknown Property method " + fn_name)

    @functools.wraps(fn)
    def _validator(self, value, line=None, rethrow=True):
        if rethrow:
            try:
                return fn(self, value)
            except Exception as e:
                raise InflateError(self.get_key(self.name), self.owner, str(e), line) from e
        else:
            # For using with ArrayProperty where we don't want an InflateError per item.
            return fn(self, value)

    return _validator


class Property:
    """
    Base class for scenario fields.

    :param required: Marks the field as required. Defaults to ``False``.
    :type required: :class:`bool`
    :param default: A default value or callable that returns one, used when a
                    section does not set this field.
    :param key: The key this field is written as in a scenario file. Defaults
                to the attribute name.
    :type key: :class:`str`
    :param help_text: Optional, listed by ``reeb_rigidity fields``.
    :type help_text: :class:`str`
    """

    python_type: type = None

    def __init__(self, required=False, default=None, key=None, help_text=None):
        if default is not None and required:
            raise ValueError("The arguments `required` and `default` are mutually exclusive.")
        self.required = required
        self.default = default
        self.has_default = self.default is not None
        self.key = key
        self.help_text = help_text
        self.name = None
        self.owner = None

    def __set_name__(self, owner, name):
        self.name = name
        self.owner = getattr(owner, "__section__", None) or owner.__name__.lower()

    def default_value(self):
        """
        Generate a default value

        :return: the value
        """
        if self.has_default:
            if hasattr(self.default, "__call__"):
                return self.default()
            return self.default
        raise ValueError("No default value specified")

    def get_key(self, attribute_name):
        """
        Returns the key this field is read from: ``key`` if supplied upon
        construction, otherwise the attribute name.
        """
        return self.key or attribute_name


class StringProperty(Property):
    """
    Stores a string

    :param choices: The valid values. If the default value ``None`` is used,
                    any string is valid.
    :type choices: Any iterable of strings, or a mapping whose keys are the
                   valid values.
    """

    python_type: type[str] = str

    def __init__(self, choices=None, **kwargs):
        super().__init__(**kwargs)
        if choices is None:
            self.choices = None
        else:
            try:
                self.choices = tuple(dict(choices)) if hasattr(choices, "items") else tuple(choices)
            except Exception as exc:
                raise ValueError("The choices argument must be iterable.") from exc

    @validator
    def inflate(self, value):
        value = str(value).strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        if self.choices is not None and value not in self.choices:
            raise ValueError(f"Invalid choice: {value} (expected one of {', '.join(self.choices)})")
        return value

    def default_value(self):
        return str(super().default_value())


class IntegerProperty(Property):
    """
    Stores an Integer value
    """

    python_type: type[int] = int

    @validator
    def inflate(self, value):
        return int(str(value).strip())

    def default_value(self):
        return int(super().default_value())


class FloatProperty(Property):
    """
    Store a floating point value; ``inf`` is accepted.
    """

    python_type: type[float] = float

    @validator
    def inflate(self, value):
        return float(str(value).strip())

    def default_value(self):
        return float(super().default_value())


class BooleanProperty(Property):
    """
    Stores a boolean value written as true/false, yes/no, on/off or 1/0
    """

    python_type: type[bool] = bool

    @validator
    def inflate(self, value):
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ValueError(f"{value!r} is not a boolean")

    def default_value(self):
        return bool(super().default_value())


class ArrayProperty(Property):
    """
    Stores a tuple of items written as ``1, 2, 3`` or ``(1, 2, 3)``
    """

    python_type: type[tuple] = tuple

    def __init__(self, base_property=None, **kwargs):
        """
        Store a tuple of values, optionally of a specific type.

        :param base_property: Item type e.g FloatProperty for floats
        :type: Property
        """
        if base_property is not None:
            if not isinstance(base_property, Property):
                raise TypeError("Expecting reebrigidity Property")

            if isinstance(base_property, ArrayProperty):
                raise TypeError("Cannot have nested ArrayProperty")

            for illegal_attr in ["default", "required"]:
                if getattr(base_property, illegal_attr, None):
                    raise ValueError(f'ArrayProperty base_property cannot have "{illegal_attr}" set')

        self.base_property = base_property

        super().__init__(**kwargs)

    @validator
    def inflate(self, value):
        if isinstance(value, str):
            items = [p for p in re.split(r"[,\s]+", value.strip().strip("()[]")) if p]
        else:
            items = list(value)
        if self.base_property:
            return tuple(self.base_property.inflate(item, rethrow=False) for item in items)

        return tuple(items)

    def default_value(self):
        return tuple(super().default_value())

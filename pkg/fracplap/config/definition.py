
import inspect

from abc import ABC
from abc import abstractmethod
from collections import UserDict
from contextlib import suppress


class InvalidConfigError(Exception):
    pass


class Definition(ABC, UserDict):
    '''One block of an experiment config.

    The block dict selects its implementation through the 'type' key; blocks
    with a single implementation may omit it, and families may name a
    DEFAULT_TYPE. A family base that declares its own SUBCLASSES registry keeps
    its TYPE() values apart from other families.
    '''
    SUBCLASSES = {}
    ABSTRACT_SUBCLASSES = {}
    DEFAULT_TYPE = None

    @classmethod
    @abstractmethod
    def TYPE(cls):
        return None

    @staticmethod
    def __new__(cls, definition, *args, **kwargs):
        if not isinstance(definition, dict):
            raise InvalidConfigError(f'{cls.__name__}: expected a mapping, got {definition!r}')
        classtype = definition.get('type') or cls.DEFAULT_TYPE
        if not classtype and not inspect.isabstract(cls):
            classtype = cls.TYPE()
        if not classtype:
            raise InvalidConfigError(f"{cls.__name__}: missing 'type': {definition}")
        subclass = cls.SUBCLASSES.get(classtype)
        if not subclass:
            if cls.ABSTRACT_SUBCLASSES.get(classtype):
                raise InvalidConfigError(f"{cls.__name__}: type '{classtype}' is abstract")
            known = ', '.join(sorted(cls.SUBCLASSES))
            raise InvalidConfigError(f"{cls.__name__}: type '{classtype}' is unknown "
                                     f"(expected one of {known})")
        return super().__new__(subclass)

    @classmethod
    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if not inspect.isabstract(cls):
            cls.SUBCLASSES[cls.TYPE()] = cls
        elif cls.TYPE():
            cls.ABSTRACT_SUBCLASSES[cls.TYPE()] = cls

    @classmethod
    def _add_fields(cls):
        '''Fields to add for this class.

        Subclasses should provide ONLY the fields they want to add; do not call super().
        '''
        return {
            'type': str,
        }

    @classmethod
    def _field_defaults(cls):
        '''Field defaults for this class.

        Subclasses should provide ONLY the defaults for the fields they add; do not call super().
        '''
        return {
            'type': cls.TYPE(),
        }

    CACHED_FIELDS = {}

    @classmethod
    def _fields(cls):
        if cls.CACHED_FIELDS.get(cls):
            return cls.CACHED_FIELDS.get(cls)

        fields = {}
        for c in reversed(inspect.getmro(cls)):
            if not issubclass(c, Definition):
                continue
            if '_add_fields' not in c.__dict__:
                continue
            defaults = c._field_defaults() if '_field_defaults' in c.__dict__ else {}
            fields.update({k: {'fieldclasses': v, 'default': (defaults or {}).get(k)}
                           for k, v in c._add_fields().items()})
        cls.CACHED_FIELDS[cls] = {k: DefinitionField(**v) for k, v in fields.items()}
        return cls.CACHED_FIELDS[cls]

    @property
    def fields(self):
        return self._fields()

    def __init__(self, definition, *, block=None):
        '''block names where this definition sits in the config, for diagnostics.'''
        super().__init__(definition)
        self.block = block or self.__class__.__name__.lower()
        self.setup()

    def __repr__(self):
        return f'{self.__class__.__name__}({self.block}, {self.data})'

    def _raise(self, msg, *args, **kwargs):
        clsname = self.__class__.__name__
        raise InvalidConfigError(f'{clsname}({self.block}): {msg}', *args, **kwargs)

    def __missing__(self, field):
        if field in self.fields:
            return self.fields.get(field).default
        raise KeyError(field)

    def setup(self):
        # setdefault would see the __missing__ default
        if 'type' not in self.data:
            self.data['type'] = self.TYPE()
        if self.get('type') != self.TYPE():
            self._raise(f"type '{self.get('type')}' != '{self.TYPE()}'")

        self.check_invalid_fields()
        self.check_required_fields()

        try:
            for field, value in self.items():
                definitionfield = self.fields.get(field)
                self[field] = definitionfield.convert(value)
                definitionfield.check(self[field])
        except InvalidConfigError as e:
            self._raise(f"field '{field}': {e}")

        self.validate()

    def validate(self):
        '''Checks across fields; call _raise on failure.'''
        pass

    def check_invalid_fields(self):
        invalid = set(self.keys()) - set(self.fields.keys())
        if invalid:
            self._raise(f"invalid fields: '{','.join(sorted(invalid))}'")

    def check_required_fields(self):
        required = set(f for f, v in self.fields.items()
                       if v.default is None and not v.optional)
        missing = required - set(self.keys())
        if missing:
            self._raise(f"required fields: '{','.join(sorted(missing))}'")

    def value(self, field):
        '''The field value, or its default when unset.'''
        return self.get(field, self.fields.get(field).default)


class DefinitionField(object):
    '''DefinitionField class.

    The 'fieldclasses' should be one class, or a list of possible classes,
    from FIELD_CLASSES.

    If only one of 'bool', 'int', 'float' or 'str' is set, the value will be
    coerced to that class; YAML reads '1e-8' as a string, so floats accept
    strings. If 'list' is one of the field classes, a scalar value is wrapped
    in a list.

    If 'default' is set, it will be used if this field is not set, and this
    field is considered optional; otherwise it is required, unless the
    default is the OPTIONAL marker.
    '''
    FIELD_CLASSES = [
        bool,
        dict,
        float,
        int,
        list,
        str,
    ]

    OPTIONAL = object()

    def __init__(self, fieldclasses, *, default=None):
        if not isinstance(fieldclasses, list):
            fieldclasses = [fieldclasses]
        for c in fieldclasses:
            if c not in self.FIELD_CLASSES:
                raise InvalidConfigError(f"Invalid field class '{c}'")
        self.fieldclasses = set(fieldclasses)
        self.optional = default is self.OPTIONAL
        self.default = None if self.optional else default

    @property
    def fieldnames(self):
        return sorted(c.__name__ for c in self.fieldclasses)

    def convert(self, value):
        if value is None:
            return None

        if set([bool]) == self.fieldclasses:
            with suppress(Exception):
                value = str(value).strip().lower()
                if value in ('true', 'yes', '1'):
                    return True
                if value in ('false', 'no', '0'):
                    return False

        if set([int]) == self.fieldclasses:
            with suppress(Exception):
                if float(value) == int(float(value)):
                    return int(float(value))

        if float in self.fieldclasses and not isinstance(value, (bool, list, dict)):
            with suppress(Exception):
                return float(value)

        if set([str]) == self.fieldclasses:
            with suppress(Exception):
                return str(value)

        if list in self.fieldclasses:
            if not isinstance(value, list):
                value = [value]

        return value

    def check(self, value):
        if value is None:
            return
        if isinstance(value, bool) and bool not in self.fieldclasses:
            raise InvalidConfigError(f"invalid {','.join(self.fieldnames)} value: '{value}'")
        if not isinstance(value, tuple(self.fieldclasses)):
            raise InvalidConfigError(f"invalid {','.join(self.fieldnames)} value: '{value}'")

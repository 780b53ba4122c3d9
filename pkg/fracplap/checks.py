
import math
import operator

from abc import ABC
from abc import abstractmethod
from functools import cached_property


class Check(ABC):
    '''One named numeric property with its tolerance context.

    A value of None, or nan, means the property could not be measured; such a
    check neither passes nor fails, and counts as a violation in a report.
    '''
    def __init__(self, name, value, bound, tol=0.0):
        self.name = name
        self.value = self.to_float(value)
        self.bound = self.to_float(bound)
        self.tol = float(tol)

    @classmethod
    def to_float(cls, value):
        if value is None:
            return None
        value = float(value)
        return None if math.isnan(value) else value

    @abstractmethod
    def compare(self):
        pass

    @abstractmethod
    def describe(self):
        pass

    @property
    def passed(self):
        return self.compare() is True

    def to_dict(self):
        return {'name': self.name, 'value': self.value, 'bound': self.bound, 'tol': self.tol,
                'pass': self.passed, 'describe': self.describe()}


class OpCheck(Check):
    @property
    @abstractmethod
    def operator(self):
        pass

    @property
    @abstractmethod
    def opstrings(self):
        pass

    @property
    def measured(self):
        return self.value

    @property
    @abstractmethod
    def threshold(self):
        pass

    @cached_property
    def result(self):
        if self.measured is None or self.bound is None:
            return None
        return bool(self.operator(self.measured, self.threshold))

    def compare(self):
        return self.result

    def describe(self):
        if self.result is None:
            return f'{self.name}: {self.value} ? {self.bound}'
        op = self.opstrings[0] if self.result else self.opstrings[1]
        return f'{self.name}: {self.measured!r} {op} {self.threshold!r}'


class GeCheck(OpCheck):
    '''value >= bound - tol'''
    @property
    def operator(self):
        return operator.ge

    @property
    def opstrings(self):
        return ['>=', '<']

    @property
    def threshold(self):
        return self.bound - self.tol


class LeCheck(OpCheck):
    '''value <= bound + tol'''
    @property
    def operator(self):
        return operator.le

    @property
    def opstrings(self):
        return ['<=', '>']

    @property
    def threshold(self):
        return self.bound + self.tol


class AbsLeCheck(LeCheck):
    '''|value - bound| <= tol'''
    @property
    def measured(self):
        if self.value is None or self.bound is None:
            return None
        return abs(self.value - self.bound)

    @property
    def threshold(self):
        return self.tol


class EqCheck(OpCheck):
    '''value == bound exactly; for counts and verdict flags.'''
    @property
    def operator(self):
        return operator.eq

    @property
    def opstrings(self):
        return ['==', '!=']

    @property
    def threshold(self):
        return self.bound


def checks_pass(checks):
    return all(c.passed for c in checks)

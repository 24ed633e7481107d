from typing import List

import pandas as pd

class Field:
    def __init__(
        self,
        name: str,
        type: str,
        description: str = None,
        form: str = None) -> None:

        self.name = name
        self.type = type
        self.description = description
        self.form = form

    def __eq__(self, __o: object) -> bool:
        return self.name == __o.name

    def render(self, value) -> str:
        """Text form of a single value of this field. Vectors are bitstring tuples."""
        if self.form == "tuple":
            return "(" + ",".join(value) + ")"
        return str(value)

class Schema:
    def __init__(self, fields: List[Field] = None) -> None:

        self.fields = fields or []

    @property
    def field_names(self):
        return [field.name for field in self.fields]

    def add_field(self, field: Field) -> None:
        self.fields.append(
            field
        )

    def empty_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: [] for name in self.field_names})

import logging

import pandas as pd

from chow_calculus.core.schema import Schema
from chow_calculus.core.utils import ChowCalculusError

class InvalidResultFrame(ChowCalculusError):
  pass

class ResultTable:
  """A result listing backed by a pandas dataframe that has to match a schema.
  """

  description = None
  name = "generic"

  def __init__(self) -> None:

      self._frame = None
      self.log = logging.getLogger("main")
      self.schema = Schema()

  def __str__(self) -> str:
      return f'ResultTable(name={self.name})'

  def __len__(self) -> int:
    return 0 if self._frame is None else len(self._frame)

  @property
  def frame(self) -> pd.DataFrame:
    return self._frame

  @frame.setter
  def frame(self, df):

    df_type = type(df)
    if df_type != pd.DataFrame:
      raise InvalidResultFrame(f"Invalid df type: {df_type}")
    else:
      df_cols_set = set(df.columns.values)
      schema_cols_set = set(self.schema.field_names)
      set_difference = (df_cols_set - schema_cols_set).union(
        schema_cols_set - df_cols_set
      )
      if set_difference != set():
        raise InvalidResultFrame(
          f"{self.name}: fields do not match provided schema: {set_difference}"
        )

    field_names = self.schema.field_names
    self._frame = df[field_names].reset_index(drop=True)

  def from_records(self, records) -> "ResultTable":
    records = list(records)
    if records:
      self.frame = pd.DataFrame.from_records(records)
    else:
      self.frame = self.schema.empty_frame()
    return self

  def render(self, header: bool = False) -> str:
    """Tab separated text, one line per row, in frame order.
    """
    lines = []
    if header:
      lines.append("\t".join(self.schema.field_names))
    if self._frame is not None:
      for row in self._frame.itertuples(index=False):
        lines.append("\t".join(
          field.render(value) for field, value in zip(self.schema.fields, row)
        ))
    return "\n".join(lines)

from typing import Any, Callable, NewType, Tuple

HandleId = NewType("HandleId", int)
BasisKey = Tuple[int, ...]
Relation = Callable[[Any, Any], int]

"""create decomposition runs

Revision ID: 5c1e2f7a9b04
Revises: 
Create Date: 2026-10-18 10:42:07.118306

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '5c1e2f7a9b04'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('decomposition_runs',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('method', sa.String(length=20), nullable=False),
    sa.Column('rows', sa.Integer(), nullable=False),
    sa.Column('cols', sa.Integer(), nullable=False),
    sa.Column('k', sa.Integer(), nullable=False),
    sa.Column('anneal_time', sa.Float(), nullable=True),
    sa.Column('tol', sa.Float(), nullable=True),
    sa.Column('restarts', sa.Integer(), nullable=False),
    sa.Column('singular_values', sa.JSON(), nullable=False),
    sa.Column('result', sa.JSON(), nullable=False),
    sa.Column('matrix_digest', sa.String(length=32), nullable=False),
    sa.Column('created_at', sa.DateTime(timezone=True), nullable=False),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_decomposition_runs_id'), 'decomposition_runs', ['id'], unique=False)
    op.create_index(op.f('ix_decomposition_runs_matrix_digest'), 'decomposition_runs', ['matrix_digest'], unique=False)
    op.create_index(op.f('ix_decomposition_runs_created_at'), 'decomposition_runs', ['created_at'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_decomposition_runs_created_at'), table_name='decomposition_runs')
    op.drop_index(op.f('ix_decomposition_runs_matrix_digest'), table_name='decomposition_runs')
    op.drop_index(op.f('ix_decomposition_runs_id'), table_name='decomposition_runs')
    op.drop_table('decomposition_runs')

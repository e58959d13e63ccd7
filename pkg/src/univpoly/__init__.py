"""Elaborate impredicative signatures into universe-polymorphic predicative ones."""

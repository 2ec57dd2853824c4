from django.contrib import admin

from .models import ProofRun


@admin.register(ProofRun)
class ProofRunAdmin(admin.ModelAdmin):
    list_display = ('scenario', 'batch', 'trial', 'seed', 'kind', 'iterations', 'total_time', 'created_at')
    list_filter = ('kind', 'batch')
    search_fields = ('scenario', 'batch', 'bitmap_sha256')
    date_hierarchy = 'created_at'
    ordering = ('-created_at',)
    readonly_fields = ('verdict', 'params', 'dims', 'bitmap_sha256')
